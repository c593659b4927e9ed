//! Finite models of G-modules, derivations, twisted G-sets `M_d`, the
//! Hochschild solution `v`, coset retractions and the untwisting of
//! function G-sets `(E, A)`.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::gaction::{FiniteGroup, GSet, GroupError, Subgroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlmostError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("cyclic factor orders must be at least 2, got {0}")]
    BadModulus(u64),
    #[error("module of order {0} is too large to tabulate")]
    TooLarge(u128),
    #[error("matrix {index} has the wrong shape")]
    MatrixShape { index: usize },
    #[error("matrix {index} entry ({row}, {col}) is not a well-defined homomorphism")]
    IllDefinedEntry { index: usize, row: usize, col: usize },
    #[error("matrix {index} is not invertible on the carrier")]
    NotAutomorphism { index: usize },
    #[error("action law fails: {0}")]
    ActionLaw(String),
    #[error("{given} generator matrices for {expected} generators")]
    GeneratorCount { given: usize, expected: usize },
    #[error("element {0} out of range")]
    ElementOutOfRange(usize),
    #[error("map has {got} entries, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("not a derivation: d({x}·{y}) ≠ d({x}) + {x}·d({y})")]
    NotADerivation { x: usize, y: usize },
    #[error("generator values do not extend to a derivation")]
    InconsistentGeneratorValues,
    #[error("not a submodule")]
    NotSubmodule,
    #[error("π is not additive")]
    NotAdditive,
    #[error("π is not equivariant at g = {g}, m = {m}")]
    NotEquivariant { g: usize, m: usize },
    #[error("π is not a retraction onto P")]
    NotIdempotent,
    #[error("v + P is not G-stable (g = {0})")]
    CosetNotStable(usize),
    #[error("stabilizer of e{e} contains g = {g}, which acts nontrivially on A")]
    StabilizerActsNontrivially { e: usize, g: usize },
    #[error("transversal does not meet every orbit exactly once")]
    BadTransversal,
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

const MAX_TABLE: u128 = 1 << 22;

/// `Z/n₁ × … × Z/n_k`; elements are indexed in mixed radix with the last
/// coordinate varying fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    moduli: Vec<u64>,
    order: usize,
}

impl AbelianGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self, AlmostError> {
        if let Some(&n) = moduli.iter().find(|&&n| n < 2) {
            return Err(AlmostError::BadModulus(n));
        }
        let order = moduli.iter().try_fold(1u128, |acc, &n| {
            let next = acc * n as u128;
            (next <= MAX_TABLE).then_some(next)
        });
        let order = order.ok_or_else(|| AlmostError::TooLarge(moduli.iter().map(|&n| n as u128).product()))?;
        Ok(AbelianGroup { moduli, order: order as usize })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn coords(&self, mut x: usize) -> Vec<u64> {
        let mut c = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            let n = self.moduli[i] as usize;
            c[i] = (x % n) as u64;
            x /= n;
        }
        c
    }

    /// Index of the element with the given coordinates, reduced.
    pub fn index(&self, coords: &[i64]) -> usize {
        coords.iter().zip(&self.moduli).fold(0, |acc, (&c, &n)| acc * n as usize + c.rem_euclid(n as i64) as usize)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let sum: Vec<i64> = ca.iter().zip(&cb).map(|(&x, &y)| (x + y) as i64).collect();
        self.index(&sum)
    }

    pub fn neg(&self, a: usize) -> usize {
        let c: Vec<i64> = self.coords(a).iter().map(|&x| -(x as i64)).collect();
        self.index(&c)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }
}

/// An integer matrix acting on coordinates: `(A·m)_i = Σ_j A_ij m_j mod n_i`.
pub type Matrix = Vec<Vec<i64>>;

fn identity_matrix(k: usize) -> Matrix {
    (0..k).map(|i| (0..k).map(|j| i64::from(i == j)).collect()).collect()
}

/// A finite G-module: an abelian group on which `G` acts by automorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    group: Arc<FiniteGroup>,
    carrier: AbelianGroup,
    matrices: Vec<Matrix>,
    table: Vec<usize>,
}

impl GModule {
    /// Builds the module from one matrix per group generator.
    pub fn from_generator_matrices(
        group: &Arc<FiniteGroup>,
        carrier: AbelianGroup,
        generators: &[Matrix],
    ) -> Result<Self, AlmostError> {
        if generators.len() != group.generators().len() {
            return Err(AlmostError::GeneratorCount { given: generators.len(), expected: group.generators().len() });
        }
        let k = carrier.rank();
        let mut reduced = Vec::new();
        for (index, a) in generators.iter().enumerate() {
            if a.len() != k || a.iter().any(|row| row.len() != k) {
                return Err(AlmostError::MatrixShape { index });
            }
            for row in 0..k {
                for col in 0..k {
                    let (ni, nj) = (carrier.moduli[row] as i128, carrier.moduli[col] as i128);
                    if (a[row][col] as i128 * nj).rem_euclid(ni) != 0 {
                        return Err(AlmostError::IllDefinedEntry { index, row, col });
                    }
                }
            }
            reduced.push(reduce(&carrier, a));
        }
        let matrices: Vec<Matrix> = group
            .elements()
            .map(|g| {
                group.word(g).iter().fold(identity_matrix(k), |acc, &s| reduce(&carrier, &mat_mul(&acc, &reduced[s])))
            })
            .collect();
        Self::from_element_matrices(group, carrier, matrices)
    }

    fn from_element_matrices(
        group: &Arc<FiniteGroup>,
        carrier: AbelianGroup,
        matrices: Vec<Matrix>,
    ) -> Result<Self, AlmostError> {
        let size = group.order() as u128 * carrier.order() as u128;
        if size > MAX_TABLE {
            return Err(AlmostError::TooLarge(size));
        }
        let mut table = Vec::with_capacity(size as usize);
        for (g, a) in matrices.iter().enumerate() {
            let row: Vec<usize> = carrier.elements().map(|m| apply(&carrier, a, m)).collect();
            let mut seen = vec![false; carrier.order()];
            for &x in &row {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(AlmostError::NotAutomorphism { index: g });
                }
            }
            table.extend(row);
        }
        let module = GModule { group: Arc::clone(group), carrier, matrices, table };
        module.check_action_law()?;
        Ok(module)
    }

    fn check_action_law(&self) -> Result<(), AlmostError> {
        let g = &self.group;
        for a in g.elements() {
            for b in g.elements() {
                let ab = g.mul(a, b);
                if let Some(m) = self.carrier.elements().find(|&m| self.act(ab, m) != self.act(a, self.act(b, m))) {
                    return Err(AlmostError::ActionLaw(format!("(g·h)·{m} ≠ g·(h·{m}) for g={a}, h={b}")));
                }
            }
        }
        Ok(())
    }

    pub fn trivial(group: &Arc<FiniteGroup>, carrier: AbelianGroup) -> Result<Self, AlmostError> {
        let k = carrier.rank();
        let gens = vec![identity_matrix(k); group.generators().len()];
        Self::from_generator_matrices(group, carrier, &gens)
    }

    /// Functions `X → A` with `(g·φ)(x) = φ(g⁻¹·x)`; coordinates are grouped
    /// by point of `X`.
    pub fn permutation(set: &GSet, base: &AbelianGroup) -> Result<Self, AlmostError> {
        let group = set.group();
        let (n, r) = (set.size(), base.rank());
        let moduli: Vec<u64> = (0..n).flat_map(|_| base.moduli.iter().copied()).collect();
        let carrier = AbelianGroup::new(moduli)?;
        let matrices = group
            .elements()
            .map(|g| {
                let mut a = vec![vec![0; n * r]; n * r];
                for x in 0..n {
                    // (gφ)(g·x) = φ(x)
                    let gx = set.act(g, x);
                    for i in 0..r {
                        a[gx * r + i][x * r + i] = 1;
                    }
                }
                a
            })
            .collect();
        Self::from_element_matrices(group, carrier, matrices)
    }

    /// The induced module `AG` = functions `G → A` under left translation.
    pub fn induced(group: &Arc<FiniteGroup>, base: &AbelianGroup) -> Result<Self, AlmostError> {
        Self::permutation(&GSet::regular(group), base)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn carrier(&self) -> &AbelianGroup {
        &self.carrier
    }

    pub fn order(&self) -> usize {
        self.carrier.order()
    }

    pub fn act(&self, g: usize, m: usize) -> usize {
        self.table[g * self.carrier.order() + m]
    }

    pub fn matrix(&self, g: usize) -> &Matrix {
        &self.matrices[g]
    }

    pub fn generator_matrices(&self) -> Vec<Matrix> {
        self.group.generators().iter().map(|&s| self.matrices[s].clone()).collect()
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.carrier.add(a, b)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.carrier.sub(a, b)
    }

    pub fn neg(&self, a: usize) -> usize {
        self.carrier.neg(a)
    }

    /// The underlying G-set.
    pub fn gset(&self) -> GSet {
        let rows = self
            .group
            .elements()
            .map(|g| self.carrier.elements().map(|m| self.act(g, m)).collect())
            .collect();
        GSet::from_table(&self.group, self.order(), rows).expect("module action is an action")
    }

    pub fn is_submodule(&self, p: &BTreeSet<usize>) -> bool {
        p.contains(&0)
            && p.iter().all(|&a| p.iter().all(|&b| p.contains(&self.add(a, b))))
            && p.iter().all(|&a| self.group.elements().all(|g| p.contains(&self.act(g, a))))
    }
}

fn reduce(carrier: &AbelianGroup, a: &Matrix) -> Matrix {
    a.iter()
        .enumerate()
        .map(|(i, row)| row.iter().map(|&x| x.rem_euclid(carrier.moduli[i] as i64)).collect())
        .collect()
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let k = a.len();
    (0..k)
        .map(|i| (0..k).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

fn apply(carrier: &AbelianGroup, a: &Matrix, m: usize) -> usize {
    let c = carrier.coords(m);
    let out: Vec<i64> = a.iter().map(|row| row.iter().zip(&c).map(|(&x, &y)| x * y as i64).sum()).collect();
    carrier.index(&out)
}

/// A map `d: G → M`, one module element per group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub values: Vec<usize>,
}

impl Derivation {
    pub fn zero(m: &GModule) -> Self {
        Derivation { values: vec![0; m.group().order()] }
    }

    /// `ad v: g ↦ g·v − v`.
    pub fn inner(m: &GModule, v: usize) -> Self {
        Derivation { values: m.group().elements().map(|g| m.sub(m.act(g, v), v)).collect() }
    }

    /// Extends generator values by `d(s·h) = d(s) + s·d(h)`.
    pub fn from_generator_values(m: &GModule, values: &[usize]) -> Result<Self, AlmostError> {
        let group = m.group();
        if values.len() != group.generators().len() {
            return Err(AlmostError::GeneratorCount { given: values.len(), expected: group.generators().len() });
        }
        if let Some(&x) = values.iter().find(|&&x| x >= m.order()) {
            return Err(AlmostError::ElementOutOfRange(x));
        }
        let d = Derivation {
            values: group
                .elements()
                .map(|g| {
                    group.word(g).iter().rev().fold((group.identity(), 0), |(h, dh), &s| {
                        (group.mul(group.generators()[s], h), m.add(values[s], m.act(group.generators()[s], dh)))
                    }).1
                })
                .collect(),
        };
        if check_derivation(m, &d) {
            Ok(d)
        } else {
            Err(AlmostError::InconsistentGeneratorValues)
        }
    }

    pub fn value(&self, g: usize) -> usize {
        self.values[g]
    }

    pub fn add(&self, m: &GModule, other: &Derivation) -> Derivation {
        Derivation { values: self.values.iter().zip(&other.values).map(|(&a, &b)| m.add(a, b)).collect() }
    }

    /// `{g : d(g) = 0}`.
    pub fn kernel(&self, m: &GModule) -> Result<Subgroup, AlmostError> {
        let elems = m.group().elements().filter(|&g| self.values[g] == 0).collect();
        Ok(Subgroup::new(m.group(), elems)?)
    }
}

/// Exhaustive check of `d(xy) = d(x) + x·d(y)`.
pub fn check_derivation(m: &GModule, d: &Derivation) -> bool {
    derivation_failure(m, d).is_none()
}

fn derivation_failure(m: &GModule, d: &Derivation) -> Option<(usize, usize)> {
    let group = m.group();
    if d.values.len() != group.order() || d.values.iter().any(|&x| x >= m.order()) {
        return Some((0, 0));
    }
    for x in group.elements() {
        for y in group.elements() {
            if d.values[group.mul(x, y)] != m.add(d.values[x], m.act(x, d.values[y])) {
                return Some((x, y));
            }
        }
    }
    None
}

/// All derivations `G → M`, found by extending every choice of generator values.
pub fn all_derivations(m: &GModule) -> Vec<Derivation> {
    let k = m.group().generators().len();
    let mut out = Vec::new();
    let mut choice = vec![0; k];
    loop {
        if let Ok(d) = Derivation::from_generator_values(m, &choice) {
            out.push(d);
        }
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            choice[i] += 1;
            if choice[i] < m.order() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// The table of `g·m = gm + d(g)`, without checking the cocycle condition.
pub fn twisted_table(m: &GModule, d: &Derivation) -> Vec<Vec<usize>> {
    m.group()
        .elements()
        .map(|g| (0..m.order()).map(|x| m.add(m.act(g, x), d.values[g])).collect())
        .collect()
}

/// `M_d`: the carrier of `M` with action `g·m = gm + d(g)`.
pub fn twisted_gset(m: &GModule, d: &Derivation) -> Result<GSet, AlmostError> {
    if let Some((x, y)) = derivation_failure(m, d) {
        return Err(AlmostError::NotADerivation { x, y });
    }
    Ok(GSet::from_table(m.group(), m.order(), twisted_table(m, d))?)
}

/// Hochschild's solution `v: x ↦ −(d(x))(x)` of `g·v − v = d(g)` for a
/// derivation into the induced module `AG`.
pub fn hochschild_v(ag: &GModule, base: &AbelianGroup, d: &Derivation) -> Result<usize, AlmostError> {
    if let Some((x, y)) = derivation_failure(ag, d) {
        return Err(AlmostError::NotADerivation { x, y });
    }
    let n = ag.group().order();
    if ag.carrier().rank() != n * base.rank() {
        return Err(AlmostError::LengthMismatch { got: ag.carrier().rank(), expected: n * base.rank() });
    }
    let r = base.rank();
    let mut coords = vec![0i64; n * r];
    for x in 0..n {
        let dx = ag.carrier().coords(d.values[x]);
        for i in 0..r {
            coords[x * r + i] = -(dx[x * r + i] as i64);
        }
    }
    Ok(ag.carrier().index(&coords))
}

/// The retraction `v + m ↦ v + π(m)` of `M` onto the coset `v + P`, as a
/// map on absolute elements of `M`. Verified exhaustively.
pub fn coset_retraction(m: &GModule, v: usize, p: &BTreeSet<usize>, pi: &[usize]) -> Result<Vec<usize>, AlmostError> {
    if v >= m.order() {
        return Err(AlmostError::ElementOutOfRange(v));
    }
    if pi.len() != m.order() {
        return Err(AlmostError::LengthMismatch { got: pi.len(), expected: m.order() });
    }
    if let Some(&x) = pi.iter().chain(p).find(|&&x| x >= m.order()) {
        return Err(AlmostError::ElementOutOfRange(x));
    }
    if !m.is_submodule(p) {
        return Err(AlmostError::NotSubmodule);
    }
    let elems = m.carrier().elements();
    if elems.clone().any(|a| elems.clone().any(|b| pi[m.add(a, b)] != m.add(pi[a], pi[b]))) {
        return Err(AlmostError::NotAdditive);
    }
    for g in m.group().elements() {
        if let Some(x) = elems.clone().find(|&x| pi[m.act(g, x)] != m.act(g, pi[x])) {
            return Err(AlmostError::NotEquivariant { g, m: x });
        }
    }
    if p.iter().any(|&x| pi[x] != x) || pi.iter().any(|x| !p.contains(x)) {
        return Err(AlmostError::NotIdempotent);
    }
    let d = Derivation::inner(m, v);
    if let Some(g) = m.group().elements().find(|&g| !p.contains(&d.values[g])) {
        return Err(AlmostError::CosetNotStable(g));
    }
    let r: Vec<usize> = elems.clone().map(|x| m.add(v, pi[m.sub(x, v)])).collect();
    for g in m.group().elements() {
        for x in elems.clone() {
            if r[m.act(g, x)] != m.act(g, r[x]) {
                return Err(AlmostError::Internal(format!("retraction not equivariant at g={g}, x={x}")));
            }
        }
    }
    for x in elems {
        if p.contains(&m.sub(x, v)) && r[x] != x {
            return Err(AlmostError::Internal(format!("retraction moves {x} in v + P")));
        }
    }
    Ok(r)
}

/// The points where two functions differ.
pub fn difference_set(a: &[usize], b: &[usize]) -> BTreeSet<usize> {
    (0..a.len().max(b.len())).filter(|&i| a.get(i) != b.get(i)).collect()
}

/// Almost equality: the difference set is finite. Functions here have
/// finite domain, so this holds whenever both are defined on the same set.
pub fn almost_equal(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && difference_set(a, b).len() <= a.len()
}

/// `(g·φ)(e) = g·φ(g⁻¹·e)` on the function G-set `(E, A)`.
pub fn act_on_functions(e: &GSet, a: &GSet, g: usize, phi: &[usize]) -> Vec<usize> {
    let gi = e.group().inv(g);
    (0..e.size()).map(|x| a.act(g, phi[e.act(gi, x)])).collect()
}

/// `(g·ψ)(e) = ψ(g⁻¹·e)` on `(E, Ā)`.
pub fn act_on_functions_trivial(e: &GSet, g: usize, psi: &[usize]) -> Vec<usize> {
    let gi = e.group().inv(g);
    (0..e.size()).map(|x| psi[e.act(gi, x)]).collect()
}

/// The untwisting isomorphism `(E, A) → (E, Ā)` and its inverse, relative
/// to a transversal `E₀`.
#[derive(Clone, Debug)]
pub struct Untwist {
    e: GSet,
    a: GSet,
    /// For each point, an element `g` with `g·e₀ = point`.
    transporter: Vec<usize>,
}

impl Untwist {
    /// Requires every stabilizer `G_e` to act trivially on `A`.
    pub fn new(e: &GSet, a: &GSet, transversal: &[usize]) -> Result<Self, AlmostError> {
        let u = Self::new_unchecked(e, a, transversal)?;
        for x in 0..e.size() {
            for &g in e.stabilizer(x)?.elements() {
                if (0..a.size()).any(|y| a.act(g, y) != y) {
                    return Err(AlmostError::StabilizerActsNontrivially { e: x, g });
                }
            }
        }
        Ok(u)
    }

    /// Skips the stabilizer condition; [`Untwist::is_well_defined`] then
    /// detects functions where the choice of `g` matters.
    pub fn new_unchecked(e: &GSet, a: &GSet, transversal: &[usize]) -> Result<Self, AlmostError> {
        if e.group() != a.group() {
            return Err(AlmostError::Group(GroupError::BadAction("E and A carry different groups".into())));
        }
        let mut rep = vec![None; e.size()];
        for &t in transversal {
            if t >= e.size() {
                return Err(AlmostError::ElementOutOfRange(t));
            }
            for x in e.orbit(t)? {
                if rep[x].replace(t).is_some() {
                    return Err(AlmostError::BadTransversal);
                }
            }
        }
        let transporter = rep
            .iter()
            .enumerate()
            .map(|(x, r)| {
                let r = r.ok_or(AlmostError::BadTransversal)?;
                Ok(e.transporter(r, x).expect("same orbit"))
            })
            .collect::<Result<Vec<_>, AlmostError>>()?;
        Ok(Untwist { e: e.clone(), a: a.clone(), transporter })
    }

    /// `φ̂(g·e₀) = g⁻¹·φ(g·e₀)`.
    pub fn hat(&self, phi: &[usize]) -> Vec<usize> {
        let group = self.e.group();
        (0..self.e.size()).map(|x| self.a.act(group.inv(self.transporter[x]), phi[x])).collect()
    }

    /// `ψ̃(g·e₀) = g·ψ(g·e₀)`.
    pub fn tilde(&self, psi: &[usize]) -> Vec<usize> {
        (0..self.e.size()).map(|x| self.a.act(self.transporter[x], psi[x])).collect()
    }

    /// Whether `φ̂` is independent of the element `g` used to write each
    /// point as `g·e₀`.
    pub fn is_well_defined(&self, phi: &[usize]) -> bool {
        let group = self.e.group();
        (0..self.e.size()).all(|x| {
            let base = self.e.act(group.inv(self.transporter[x]), x);
            let value = self.a.act(group.inv(self.transporter[x]), phi[x]);
            group.elements().filter(|&g| self.e.act(g, base) == x).all(|g| self.a.act(group.inv(g), phi[x]) == value)
        })
    }
}
