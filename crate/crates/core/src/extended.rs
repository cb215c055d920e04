//! One-step deflation through multiplication-matrix structure equations:
//! parametric multiplication matrices built from the primal exponent set,
//! the parametric normal form of each input polynomial, and the pairwise
//! commutator equations. The resulting extended system couples the point
//! coordinates `z` with the structure parameters `mu` and has the singular
//! root as a simple root of the coupled system.

use crate::exponent::{monomials_upto, Exponent};
use crate::poly::{DomainError, PolySystem, Polynomial};
use crate::scalar::Scalar;

use std::collections::BTreeMap;

/// One unknown structure parameter: the normalized dual-basis coefficient
/// `nu_{alpha, target}` being solved for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuVariable {
    /// Row exponent `alpha_i` in `E`.
    pub alpha: Exponent,
    /// Column monomial `alpha_k + e_j` outside `E`.
    pub target: Exponent,
}

/// An entry of a parametric multiplication matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatEntry {
    Zero,
    One,
    Mu(usize),
}

/// The `n` parametric multiplication matrices for a primal exponent set
/// `E`. Matrices are stored untransposed (multiplication by `x_i - z_i` on
/// the primal basis), so they are strictly lower triangular; their
/// transposes match the usual upper-triangular display.
#[derive(Clone, Debug)]
pub struct ParametricMatrixSet {
    nvars: usize,
    e_set: Vec<Exponent>,
    nil_index: u32,
    /// Degree past which M^gamma [1] vanishes identically: the nil-index
    /// for rule-built matrices (degree grading), delta - 1 for free
    /// templates (strict triangularity is all that is known).
    power_bound: u32,
    /// mats[i] is row-major delta x delta.
    mats: Vec<Vec<MatEntry>>,
    mu_vars: Vec<MuVariable>,
}

impl ParametricMatrixSet {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn delta(&self) -> usize {
        self.e_set.len()
    }

    pub fn e_set(&self) -> &[Exponent] {
        &self.e_set
    }

    pub fn nil_index(&self) -> u32 {
        self.nil_index
    }

    pub fn mu_vars(&self) -> &[MuVariable] {
        &self.mu_vars
    }

    pub fn entry(&self, mat: usize, row: usize, col: usize) -> MatEntry {
        self.mats[mat][row * self.delta() + col]
    }

    /// Number of unknowns in the extended system: n point coordinates plus
    /// the mu parameters.
    pub fn total_unknowns(&self) -> usize {
        self.nvars + self.mu_vars.len()
    }

    /// Substitutes numeric values for the mu variables.
    pub fn instantiate<K: Scalar>(&self, mu: &[K]) -> Vec<crate::linalg::Matrix<K>> {
        assert_eq!(mu.len(), self.mu_vars.len());
        (0..self.nvars)
            .map(|i| {
                crate::linalg::Matrix::from_fn(self.delta(), self.delta(), |r, c| {
                    match self.entry(i, r, c) {
                        MatEntry::Zero => K::zero(),
                        MatEntry::One => K::one(),
                        MatEntry::Mu(idx) => mu[idx].clone(),
                    }
                })
            })
            .collect()
    }

    /// nu_{alpha_i, gamma} evaluated from numeric matrices as the (i, 1)
    /// entry of M^gamma, factors applied in index order.
    pub fn nu_from_values<K: Scalar>(&self, mu: &[K], gamma: &Exponent, i: usize) -> K {
        let mats = self.instantiate(mu);
        let mut v = vec![K::zero(); self.delta()];
        v[0] = K::one();
        for j in (0..self.nvars).rev() {
            for _ in 0..gamma.get(j) {
                v = mats[j].mul_vec(&v);
            }
        }
        v[i].clone()
    }
}

fn validate_e(e_set: &[Exponent]) -> Result<Vec<Exponent>, DomainError> {
    if e_set.is_empty() {
        return Err(DomainError::InvalidArgument("E must be nonempty".into()));
    }
    // sort by degree, keeping the caller's order within a degree (the
    // template path relies on positional identity)
    let mut sorted = e_set.to_vec();
    sorted.sort_by_key(Exponent::degree);
    {
        let mut dedup = sorted.clone();
        dedup.sort();
        dedup.dedup();
        if dedup.len() != e_set.len() {
            return Err(DomainError::InvalidArgument(
                "E contains duplicate exponents".into(),
            ));
        }
    }
    if !sorted[0].is_constant() {
        return Err(DomainError::InvalidArgument(
            "E must contain the zero exponent".into(),
        ));
    }
    // stability under componentwise subtraction
    for alpha in &sorted {
        let n = alpha.len();
        for i in 0..n {
            if let Some(down) = alpha.sub_unit(i) {
                if !sorted.contains(&down) {
                    return Err(DomainError::InvalidArgument(format!(
                        "E is not closed under subtraction: {alpha} present but {down} missing"
                    )));
                }
            }
        }
    }
    Ok(sorted)
}

/// Builds the parametric multiplication matrices for a subtraction-closed
/// exponent set `E` (sorted by degree on the way in).
///
/// Entry rule for the transposed matrix position (k, j) with target
/// `t = alpha_k + e_i`: 1 when `alpha_j = t`; 0 when `t` lies in `E`
/// otherwise; a mu variable when `t` is outside `E` and
/// `|alpha_j| >= |alpha_k| + 1` (degrees below that bound carry no dual
/// coefficient and stay 0). Mu variables are ordered by first occurrence
/// scanning (i, k, j) lexicographically.
pub fn build_parametric_matrices(e_set: &[Exponent]) -> Result<ParametricMatrixSet, DomainError> {
    let e_sorted = validate_e(e_set)?;
    let n = e_sorted[0].len();
    let delta = e_sorted.len();
    let nil_index = e_sorted.iter().map(Exponent::degree).max().unwrap_or(0);
    let mut mu_vars: Vec<MuVariable> = Vec::new();
    let mut mu_index: BTreeMap<(Exponent, Exponent), usize> = BTreeMap::new();
    let mut mats = vec![vec![MatEntry::Zero; delta * delta]; n];
    // spec ordering: scan dual-element index i, then base index k, then
    // variable j
    for i in 0..delta {
        for k in 0..delta {
            for j in 0..n {
                let target = e_sorted[k].add_unit(j);
                let entry = if e_sorted[i] == target {
                    MatEntry::One
                } else if e_sorted.contains(&target) {
                    MatEntry::Zero
                } else if e_sorted[i].degree() >= e_sorted[k].degree() + 1 {
                    let key = (e_sorted[i].clone(), target.clone());
                    let idx = *mu_index.entry(key).or_insert_with(|| {
                        mu_vars.push(MuVariable {
                            alpha: e_sorted[i].clone(),
                            target,
                        });
                        mu_vars.len() - 1
                    });
                    MatEntry::Mu(idx)
                } else {
                    MatEntry::Zero
                };
                // untransposed: row i, column k of matrix j
                mats[j][i * delta + k] = entry;
            }
        }
    }
    Ok(ParametricMatrixSet {
        nvars: n,
        e_set: e_sorted,
        nil_index,
        power_bound: nil_index,
        mats,
        mu_vars,
    })
}

/// Template cell for a caller-supplied matrix set, in the transposed
/// (upper-triangular) display orientation.
#[derive(Clone, Debug)]
pub enum TemplateCell {
    Const(i64),
    Var(&'static str),
}

/// Builds a matrix set from explicit transposed templates. This admits
/// parametrizations beyond the canonical rule (any strictly
/// upper-triangular nilpotent layout defines a valid deflation), at the
/// caller's responsibility. Named variables are interned in first-occurrence
/// order scanning matrices, then rows, then columns.
pub fn matrices_from_template(
    e_set: &[Exponent],
    templates_transposed: &[Vec<Vec<TemplateCell>>],
) -> Result<ParametricMatrixSet, DomainError> {
    let e_sorted = validate_e(e_set)?;
    let n = e_sorted[0].len();
    let delta = e_sorted.len();
    if templates_transposed.len() != n {
        return Err(DomainError::DimensionMismatch {
            expected: n,
            got: templates_transposed.len(),
        });
    }
    let nil_index = e_sorted.iter().map(Exponent::degree).max().unwrap_or(0);
    let mut names: Vec<&'static str> = Vec::new();
    let mut mu_vars: Vec<MuVariable> = Vec::new();
    let mut mats = vec![vec![MatEntry::Zero; delta * delta]; n];
    for (j, t) in templates_transposed.iter().enumerate() {
        if t.len() != delta || t.iter().any(|row| row.len() != delta) {
            return Err(DomainError::InvalidArgument(format!(
                "template {j} is not {delta}x{delta}"
            )));
        }
        for (k, row) in t.iter().enumerate() {
            for (i, cell) in row.iter().enumerate() {
                let entry = match cell {
                    TemplateCell::Const(0) => MatEntry::Zero,
                    TemplateCell::Const(1) => MatEntry::One,
                    TemplateCell::Const(c) => {
                        return Err(DomainError::InvalidArgument(format!(
                            "unsupported constant {c} in template"
                        )))
                    }
                    TemplateCell::Var(name) => {
                        let idx = match names.iter().position(|n| n == name) {
                            Some(idx) => idx,
                            None => {
                                names.push(name);
                                mu_vars.push(MuVariable {
                                    alpha: e_sorted[i].clone(),
                                    target: e_sorted[k].add_unit(j),
                                });
                                names.len() - 1
                            }
                        };
                        MatEntry::Mu(idx)
                    }
                };
                if !matches!(entry, MatEntry::Zero) && k >= i {
                    return Err(DomainError::InvalidArgument(
                        "template is not strictly upper triangular".into(),
                    ));
                }
                // transpose into the stored orientation
                mats[j][i * delta + k] = entry;
            }
        }
    }
    let power_bound = (delta as u32).saturating_sub(1);
    Ok(ParametricMatrixSet {
        nvars: n,
        e_set: e_sorted,
        nil_index,
        power_bound,
        mats,
        mu_vars,
    })
}

impl ParametricMatrixSet {
    /// The vectors `M(mu)^gamma [1]` for all |gamma| <= bound, as
    /// polynomials in the mu variables embedded in the (z, mu) ring.
    /// Recursion peels the first factor in index order, matching the fixed
    /// product order `M_1^{g_1} ... M_n^{g_n}`.
    fn power_vectors<K: Scalar>(
        &self,
        bound: u32,
    ) -> BTreeMap<Exponent, Vec<Polynomial<K>>> {
        let n = self.nvars;
        let total = n + self.mu_vars.len();
        let delta = self.delta();
        let mut out: BTreeMap<Exponent, Vec<Polynomial<K>>> = BTreeMap::new();
        let mut e1 = vec![Polynomial::zero(total); delta];
        e1[0] = Polynomial::constant(total, K::one());
        out.insert(Exponent::zero(n), e1);
        for gamma in monomials_upto(n, bound.min(self.power_bound)) {
            if gamma.is_constant() || out.contains_key(&gamma) {
                continue;
            }
            let j = (0..n).find(|&i| gamma.get(i) > 0).unwrap();
            let prev = out
                .get(&gamma.sub_unit(j).unwrap())
                .expect("graded enumeration order")
                .clone();
            let mut next = vec![Polynomial::zero(total); delta];
            for r in 0..delta {
                let mut acc = Polynomial::zero(total);
                for c in 0..delta {
                    match self.entry(j, r, c) {
                        MatEntry::Zero => {}
                        MatEntry::One => acc = acc + prev[c].clone(),
                        MatEntry::Mu(idx) => {
                            let mu_mono = Polynomial::monomial(
                                total,
                                Exponent::unit(total, n + idx),
                                K::one(),
                            );
                            acc = acc + &mu_mono * &prev[c];
                        }
                    }
                }
                next[r] = acc;
            }
            out.insert(gamma, next);
        }
        out
    }
}

/// The parametric normal form `N_{z,mu}(p)`: a vector of `delta`
/// polynomials in the joint ring (z_1..z_n, mu_1..mu_m). The sum runs over
/// |gamma| <= nil-index only (higher products vanish by nilpotency). With
/// `point` given, the z variables are substituted and the entries involve
/// only mu.
pub fn parametric_normal_form<K: Scalar>(
    p: &Polynomial<K>,
    pm: &ParametricMatrixSet,
    point: Option<&[K]>,
) -> Vec<Polynomial<K>> {
    let table = pm.power_vectors::<K>(p.total_degree());
    normal_form_with_table(p, pm, point, &table)
}

fn normal_form_with_table<K: Scalar>(
    p: &Polynomial<K>,
    pm: &ParametricMatrixSet,
    point: Option<&[K]>,
    table: &BTreeMap<Exponent, Vec<Polynomial<K>>>,
) -> Vec<Polynomial<K>> {
    let n = pm.nvars;
    let m = pm.mu_vars.len();
    let total = n + m;
    assert_eq!(p.nvars(), n);
    let mut out = vec![Polynomial::zero(total); pm.delta()];
    for (gamma, vg) in table {
        if gamma.degree() > p.total_degree() {
            continue;
        }
        let d = p.diff(gamma);
        if d.is_zero() {
            continue;
        }
        let inv_fact = K::from_ratio(1, gamma.factorial());
        match point {
            Some(pt) => {
                let c = d.eval(pt) * inv_fact;
                if c.is_zero() {
                    continue;
                }
                for (row, v) in vg.iter().enumerate() {
                    if !v.is_zero() {
                        out[row] = out[row].clone() + v.scaled(&c);
                    }
                }
            }
            None => {
                let dz = d.scaled(&inv_fact).pad_vars(m);
                for (row, v) in vg.iter().enumerate() {
                    if !v.is_zero() {
                        out[row] = out[row].clone() + &dz * v;
                    }
                }
            }
        }
    }
    out
}

/// Where an extended-system polynomial came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolyOrigin {
    NormalForm { poly: usize, row: usize },
    Commutator { i: usize, j: usize, row: usize, col: usize },
}

/// All nonzero entries of `M_i M_j - M_j M_i` for i < j, as polynomials in
/// the (z, mu) ring (they involve only mu).
pub fn commutator_equations<K: Scalar>(
    pm: &ParametricMatrixSet,
) -> Vec<(PolyOrigin, Polynomial<K>)> {
    let n = pm.nvars;
    let m = pm.mu_vars.len();
    let total = n + m;
    let delta = pm.delta();
    let sym: Vec<Vec<Polynomial<K>>> = (0..n)
        .map(|i| {
            (0..delta * delta)
                .map(|rc| match pm.mats[i][rc] {
                    MatEntry::Zero => Polynomial::zero(total),
                    MatEntry::One => Polynomial::constant(total, K::one()),
                    MatEntry::Mu(idx) => {
                        Polynomial::monomial(total, Exponent::unit(total, n + idx), K::one())
                    }
                })
                .collect()
        })
        .collect();
    let prod = |a: &[Polynomial<K>], b: &[Polynomial<K>], r: usize, c: usize| {
        let mut acc = Polynomial::zero(total);
        for k in 0..delta {
            let (x, y) = (&a[r * delta + k], &b[k * delta + c]);
            if !x.is_zero() && !y.is_zero() {
                acc = acc + x * y;
            }
        }
        acc
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for r in 0..delta {
                for c in 0..delta {
                    let e = prod(&sym[i], &sym[j], r, c) - prod(&sym[j], &sym[i], r, c);
                    if !e.is_zero() {
                        out.push((PolyOrigin::Commutator { i, j, row: r, col: c }, e));
                    }
                }
            }
        }
    }
    out
}

/// The one-step deflation system: all normal-form entries of the input
/// polynomials plus all commutator entries.
#[derive(Clone, Debug)]
pub struct ExtendedSystem<K: Scalar> {
    pub pm: ParametricMatrixSet,
    /// Polynomials in n + m variables (z first, then mu).
    pub polys: Vec<Polynomial<K>>,
    pub origins: Vec<PolyOrigin>,
    /// Entry counts before pruning identical zeros.
    pub raw_normal_form_count: usize,
    pub raw_commutator_count: usize,
}

impl<K: Scalar> ExtendedSystem<K> {
    pub fn total_unknowns(&self) -> usize {
        self.pm.total_unknowns()
    }

    /// Upper bound N*delta + n(n-1)(delta-1)(delta-2)/4 on the pruned size.
    pub fn size_bound(n_polys: usize, nvars: usize, delta: usize) -> usize {
        n_polys * delta
            + nvars * (nvars - 1) * delta.saturating_sub(1) * delta.saturating_sub(2) / 4
    }
}

/// Builds the extended system from the primal exponent set (canonical
/// parametric matrices).
pub fn build_extended_system<K: Scalar>(
    f: &PolySystem<K>,
    e_set: &[Exponent],
    point: Option<&[K]>,
) -> Result<ExtendedSystem<K>, DomainError> {
    let pm = build_parametric_matrices(e_set)?;
    build_extended_with_matrices(f, pm, point)
}

/// Builds the extended system from explicitly supplied matrices.
pub fn build_extended_with_matrices<K: Scalar>(
    f: &PolySystem<K>,
    pm: ParametricMatrixSet,
    point: Option<&[K]>,
) -> Result<ExtendedSystem<K>, DomainError> {
    if f.nvars != pm.nvars() {
        return Err(DomainError::DimensionMismatch {
            expected: pm.nvars(),
            got: f.nvars,
        });
    }
    let max_deg = f.polys.iter().map(Polynomial::total_degree).max().unwrap_or(0);
    let table = pm.power_vectors::<K>(max_deg);
    let mut polys = Vec::new();
    let mut origins = Vec::new();
    let mut raw_nf = 0usize;
    for (k, p) in f.polys.iter().enumerate() {
        let nf = normal_form_with_table(p, &pm, point, &table);
        raw_nf += nf.len();
        for (row, q) in nf.into_iter().enumerate() {
            if row == 0 && point.is_none() {
                debug_assert_eq!(q, p.pad_vars(pm.mu_vars.len()));
            }
            if !q.is_zero() {
                polys.push(q);
                origins.push(PolyOrigin::NormalForm { poly: k, row });
            }
        }
    }
    let comms = commutator_equations::<K>(&pm);
    let raw_comm_possible = pm.nvars() * (pm.nvars() - 1) / 2 * pm.delta() * pm.delta();
    for (origin, e) in comms {
        polys.push(e);
        origins.push(origin);
    }
    let bound = ExtendedSystem::<K>::size_bound(f.polys.len(), pm.nvars(), pm.delta());
    debug_assert!(
        polys.len() <= bound,
        "extended system larger than its bound: {} > {bound}",
        polys.len()
    );
    Ok(ExtendedSystem {
        pm,
        polys,
        origins,
        raw_normal_form_count: raw_nf,
        raw_commutator_count: raw_comm_possible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn e(v: &[&[u32]]) -> Vec<Exponent> {
        v.iter().map(|s| Exponent::from_slice(s)).collect()
    }

    #[test]
    fn breadth_one_pair_matrices() {
        // E = {1, x2}: M1^t = [[0, mu],[0,0]], M2^t = [[0,1],[0,0]]
        let pm = build_parametric_matrices(&e(&[&[0, 0], &[0, 1]])).unwrap();
        assert_eq!(pm.mu_vars().len(), 1);
        assert_eq!(pm.entry(0, 1, 0), MatEntry::Mu(0)); // untransposed
        assert_eq!(pm.entry(1, 1, 0), MatEntry::One);
        assert_eq!(pm.entry(0, 0, 1), MatEntry::Zero);
        assert_eq!(
            pm.mu_vars()[0],
            MuVariable {
                alpha: Exponent::from_slice(&[0, 1]),
                target: Exponent::from_slice(&[1, 0]),
            }
        );
    }

    #[test]
    fn caprasse_matrices_match_displayed_structure() {
        // E = {1, x1, x2, x1^2}: twelve mu parameters; the three targets
        // x3^2, x3 x4, x4^2 never appear in the matrices
        let pm = build_parametric_matrices(&e(&[
            &[0, 0, 0, 0],
            &[1, 0, 0, 0],
            &[0, 1, 0, 0],
            &[2, 0, 0, 0],
        ]))
        .unwrap();
        assert_eq!(pm.mu_vars().len(), 12);
        for mv in pm.mu_vars() {
            let t = &mv.target;
            assert!(t != &Exponent::from_slice(&[0, 0, 2, 0]));
            assert!(t != &Exponent::from_slice(&[0, 0, 1, 1]));
            assert!(t != &Exponent::from_slice(&[0, 0, 0, 2]));
        }
        // locate rows by exponent: E sorts ascending graded-lex
        let idx_of = |e: &[u32]| {
            pm.e_set()
                .iter()
                .position(|a| a == &Exponent::from_slice(e))
                .unwrap()
        };
        let (i_x1, i_x2, i_x1sq) = (idx_of(&[1, 0, 0, 0]), idx_of(&[0, 1, 0, 0]), idx_of(&[2, 0, 0, 0]));
        // the entry of M_1 at (row x1^2, col x2) is mu_{x1^2, x1 x2}
        match pm.entry(0, i_x1sq, i_x2) {
            MatEntry::Mu(idx) => {
                assert_eq!(pm.mu_vars()[idx].alpha, Exponent::from_slice(&[2, 0, 0, 0]));
                assert_eq!(pm.mu_vars()[idx].target, Exponent::from_slice(&[1, 1, 0, 0]));
            }
            other => panic!("expected mu, got {other:?}"),
        }
        // degree rule: the entry of M_2 at (row x2, col x1) has target
        // x1 x2 outside E but |x2| < |x1| + 1, so it carries no parameter
        assert_eq!(pm.entry(1, i_x2, i_x1), MatEntry::Zero);
    }

    #[test]
    fn normal_form_breadth_one_pair() {
        // f1 = z1 + z2^2, f2 = z1^2 + z2^2 with E = {1, x2}:
        // N(f1) = [z1 + z2^2, mu + 2 z2], N(f2) = [z1^2 + z2^2, 2 mu z1 + 2 z2]
        let pm = build_parametric_matrices(&e(&[&[0, 0], &[0, 1]])).unwrap();
        let f1: Polynomial<Rat> = Polynomial::from_terms(
            2,
            [
                (Exponent::from_slice(&[1, 0]), Rat::from_int(1)),
                (Exponent::from_slice(&[0, 2]), Rat::from_int(1)),
            ],
        );
        let f2: Polynomial<Rat> = Polynomial::from_terms(
            2,
            [
                (Exponent::from_slice(&[2, 0]), Rat::from_int(1)),
                (Exponent::from_slice(&[0, 2]), Rat::from_int(1)),
            ],
        );
        let n1 = parametric_normal_form(&f1, &pm, None);
        let n2 = parametric_normal_form(&f2, &pm, None);
        // ring is (z1, z2, mu)
        let z1 = Exponent::from_slice(&[1, 0, 0]);
        let z2 = Exponent::from_slice(&[0, 1, 0]);
        let mu = Exponent::from_slice(&[0, 0, 1]);
        assert_eq!(n1[0], f1.pad_vars(1));
        assert_eq!(
            n1[1],
            Polynomial::from_terms(3, [(mu.clone(), Rat::from_int(1)), (z2.clone(), Rat::from_int(2))])
        );
        assert_eq!(n2[0], f2.pad_vars(1));
        assert_eq!(
            n2[1],
            Polynomial::from_terms(
                3,
                [
                    (z1.add(&mu), Rat::from_int(2)),
                    (z2.clone(), Rat::from_int(2)),
                ]
            )
        );
        let _ = z1;
    }

    #[test]
    fn two_by_two_matrices_commute() {
        let pm = build_parametric_matrices(&e(&[&[0, 0], &[0, 1]])).unwrap();
        assert!(commutator_equations::<Rat>(&pm).is_empty());
    }

    #[test]
    fn extended_system_counts_and_bound() {
        let pm = build_parametric_matrices(&e(&[&[0, 0], &[0, 1]])).unwrap();
        let f: PolySystem<Rat> = PolySystem::new(
            2,
            vec![
                Polynomial::from_terms(
                    2,
                    [
                        (Exponent::from_slice(&[1, 0]), Rat::from_int(1)),
                        (Exponent::from_slice(&[0, 2]), Rat::from_int(1)),
                    ],
                ),
                Polynomial::from_terms(
                    2,
                    [
                        (Exponent::from_slice(&[2, 0]), Rat::from_int(1)),
                        (Exponent::from_slice(&[0, 2]), Rat::from_int(1)),
                    ],
                ),
            ],
        );
        let ext = build_extended_with_matrices(&f, pm, None).unwrap();
        // 4 polynomials in (z1, z2, mu), no commutators
        assert_eq!(ext.polys.len(), 4);
        assert_eq!(ext.total_unknowns(), 3);
        assert!(ext.polys.len() <= ExtendedSystem::<Rat>::size_bound(2, 2, 2));
    }

    #[test]
    fn rejects_non_subtraction_closed_e() {
        assert!(build_parametric_matrices(&e(&[&[0, 0], &[2, 0]])).is_err());
        assert!(build_parametric_matrices(&e(&[&[1, 0]])).is_err());
    }

    #[test]
    fn products_past_nil_index_vanish() {
        // any product of nil_index + 1 parametric matrices is identically
        // zero as a mu-polynomial matrix
        let pm = build_parametric_matrices(&e(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])).unwrap();
        let total = pm.total_unknowns();
        let delta = pm.delta();
        let sym: Vec<Vec<Polynomial<Rat>>> = (0..pm.nvars())
            .map(|i| {
                (0..delta * delta)
                    .map(|rc| {
                        let (r, c) = (rc / delta, rc % delta);
                        match pm.entry(i, r, c) {
                            MatEntry::Zero => Polynomial::zero(total),
                            MatEntry::One => Polynomial::constant(total, Rat::from_int(1)),
                            MatEntry::Mu(idx) => Polynomial::monomial(
                                total,
                                Exponent::unit(total, pm.nvars() + idx),
                                Rat::from_int(1),
                            ),
                        }
                    })
                    .collect()
            })
            .collect();
        let matmul = |a: &Vec<Polynomial<Rat>>, b: &Vec<Polynomial<Rat>>| -> Vec<Polynomial<Rat>> {
            let mut out = vec![Polynomial::zero(total); delta * delta];
            for r in 0..delta {
                for c in 0..delta {
                    for k in 0..delta {
                        let (x, y) = (&a[r * delta + k], &b[k * delta + c]);
                        if !x.is_zero() && !y.is_zero() {
                            out[r * delta + c] = out[r * delta + c].clone() + x * y;
                        }
                    }
                }
            }
            out
        };
        // a mixed product of length nil_index + 1 = 3: M1 * M2 * M1
        let p = matmul(&matmul(&sym[0], &sym[1]), &sym[0]);
        assert!(p.iter().all(Polynomial::is_zero));
        let q = matmul(&matmul(&sym[1], &sym[1]), &sym[1]);
        assert!(q.iter().all(Polynomial::is_zero));
    }
}
