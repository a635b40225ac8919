//! QUBO construction and structural analytics.
//!
//! Minimizing `‖Ax − b‖²` is the same as minimizing
//! `f(x) = xᵀAᵀAx − 2bᵀAx`, whose minimum value is `−bᵀb` when the system is
//! consistent. Two formulations are built:
//!
//! - vanilla: `x` is encoded directly and `f(x)` expanded as is;
//! - Sylvester: with `D = RᵀAᵀAR` and `x = Ry`, `f = yᵀDy − 2bᵀARy`, which
//!   has no coupling between different variables.
//!
//! Coefficients are computed in exact rational arithmetic from the exact
//! binary values of the `f64` inputs and rounded once when stored.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::congruence::{CongruencePair, SymMatrix};
use crate::encoding::{decode, Assignment, EncodingKind, EncodingSpec, QubitLabel, QubitRole};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Coefficients with `|c|` at or below this are not stored.
pub const ZERO_DROP: f64 = 1e-12;
/// Bound on `‖RᵀAᵀAR − D‖_max / (1 + ‖AᵀA‖_max)` accepted by the Sylvester builder.
pub const PAIR_RESIDUAL_RTOL: f64 = 1e-6;

/// Exact rational value of a finite `f64`.
pub fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(Error::NonFinite("value"))
}

/// Nearest `f64` of a rational.
pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn pow2(l: i32) -> BigRational {
    let p = BigRational::from_integer(BigInt::one() << l.unsigned_abs());
    if l >= 0 {
        p
    } else {
        p.recip()
    }
}

fn role_weight(spec: &EncodingSpec, role: QubitRole) -> BigRational {
    match role {
        QubitRole::PosDigit(l) => pow2(l),
        QubitRole::NegDigit(l) => -pow2(l),
        QubitRole::SignBit => -pow2(spec.hi + 1),
    }
}

/// The square system `Ax = b`, held exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    a: Vec<Vec<BigRational>>,
    b: Vec<BigRational>,
    a_f64: Matrix,
    b_f64: Vec<f64>,
}

impl LinearSystem {
    pub fn from_rationals(a: Vec<Vec<BigRational>>, b: Vec<BigRational>) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(Error::Dimension("system must have at least one unknown".into()));
        }
        if a.len() != n || a.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension(format!(
                "A must be {n}x{n} to match b of length {n}"
            )));
        }
        let a_f64 = Matrix::from_fn(n, n, |i, j| to_f64(&a[i][j]));
        let b_f64: Vec<f64> = b.iter().map(to_f64).collect();
        if !a_f64.is_finite() || b_f64.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("linear system"));
        }
        Ok(LinearSystem { a, b, a_f64, b_f64 })
    }

    pub fn new(a: &Matrix, b: &[f64]) -> Result<Self> {
        if !a.is_finite() || b.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("linear system"));
        }
        let rows = a
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(rational).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let b = b.iter().copied().map(rational).collect::<Result<Vec<_>>>()?;
        LinearSystem::from_rationals(rows, b)
    }

    pub fn from_rows<R: AsRef<[f64]>>(a: &[R], b: &[f64]) -> Result<Self> {
        LinearSystem::new(&Matrix::from_rows(a)?, b)
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &Matrix {
        &self.a_f64
    }

    pub fn b(&self) -> &[f64] {
        &self.b_f64
    }

    pub fn a_exact(&self) -> &[Vec<BigRational>] {
        &self.a
    }

    pub fn b_exact(&self) -> &[BigRational] {
        &self.b
    }

    /// `AᵀA`, exact.
    pub fn gram_exact(&self) -> Vec<Vec<BigRational>> {
        let n = self.n();
        let mut g = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let s = (0..n).fold(BigRational::zero(), |acc, k| acc + &self.a[k][i] * &self.a[k][j]);
                g[j][i] = s.clone();
                g[i][j] = s;
            }
        }
        g
    }

    /// `AᵀA` rounded to `f64`; exactly symmetric.
    pub fn gram(&self) -> SymMatrix {
        let g = self.gram_exact();
        let n = self.n();
        SymMatrix::new(Matrix::from_fn(n, n, |i, j| to_f64(&g[i][j])))
            .expect("Gram matrix of a finite system is symmetric and finite")
    }

    /// `bᵀA` as a row vector, exact, counting one multiply-add per product.
    fn bta(&self, cost: &mut u64) -> Vec<BigRational> {
        let n = self.n();
        (0..n)
            .map(|j| {
                (0..n).fold(BigRational::zero(), |acc, k| {
                    *cost += 1;
                    acc + &self.b[k] * &self.a[k][j]
                })
            })
            .collect()
    }

    pub fn btb_exact(&self) -> BigRational {
        self.b.iter().fold(BigRational::zero(), |acc, x| acc + x * x)
    }

    /// `bᵀb`, the offset between the QUBO energy and `‖Ax − b‖²`.
    pub fn btb(&self) -> f64 {
        to_f64(&self.btb_exact())
    }

    /// `Ax − b`.
    pub fn residual_vector(&self, x: &[f64]) -> Result<Vec<f64>> {
        let ax = self.a_f64.mul_vec(x)?;
        Ok(ax.iter().zip(&self.b_f64).map(|(p, q)| p - q).collect())
    }

    /// `‖Ax − b‖₂`.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        Ok(crate::linalg::norm2(&self.residual_vector(x)?))
    }

    /// `‖Ax − b‖² − bᵀb`, the value a ground state's energy should equal.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let r = self.residual(x)?;
        Ok(r * r - self.btb())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Store every upper-triangular position, zeros included.
    pub keep_zeros: bool,
    /// Count the multiply-adds spent on the linear coefficients.
    pub instrument: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            keep_zeros: false,
            instrument: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Formulation {
    Vanilla,
    Sylvester(CongruencePair),
}

impl Formulation {
    pub fn name(&self) -> &'static str {
        match self {
            Formulation::Vanilla => "vanilla",
            Formulation::Sylvester(_) => "sylvester",
        }
    }
}

/// How a model was produced; absent for models read from plain QUBO files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub formulation: Formulation,
    pub encoding: EncodingSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuboModel {
    n_qubits: usize,
    coeffs: BTreeMap<(usize, usize), f64>,
    offset: f64,
    provenance: Option<Provenance>,
    build_cost: Option<u64>,
}

/// Qubits and the off-diagonal couplings between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CouplingGraph {
    pub nodes: Vec<usize>,
    pub labels: Option<Vec<QubitLabel>>,
    pub edges: Vec<(usize, usize)>,
}

/// The values an assignment encodes: `y` and the recovered `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decoded {
    pub y: Vec<f64>,
    pub x: Vec<f64>,
}

impl QuboModel {
    pub fn empty(n_qubits: usize) -> Self {
        QuboModel {
            n_qubits,
            coeffs: BTreeMap::new(),
            offset: 0.0,
            provenance: None,
            build_cost: None,
        }
    }

    /// A model from raw coefficients. Keys must satisfy `i ≤ j < n_qubits`.
    /// Entries are stored as given, zeros included.
    pub fn from_coeffs(
        n_qubits: usize,
        coeffs: BTreeMap<(usize, usize), f64>,
        offset: f64,
    ) -> Result<Self> {
        for (&(i, j), &c) in &coeffs {
            if i > j {
                return Err(Error::InvalidParams(format!("key ({i}, {j}) is below the diagonal")));
            }
            if j >= n_qubits {
                return Err(Error::InvalidParams(format!(
                    "key ({i}, {j}) out of range for {n_qubits} qubits"
                )));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite("QUBO coefficient"));
            }
        }
        if !offset.is_finite() {
            return Err(Error::NonFinite("QUBO offset"));
        }
        Ok(QuboModel {
            n_qubits,
            coeffs,
            offset,
            provenance: None,
            build_cost: None,
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Result<Self> {
        if provenance.encoding.total_qubits() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                found: provenance.encoding.total_qubits(),
            });
        }
        self.provenance = Some(provenance);
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coeffs(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.coeffs
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.coeffs.get(&key).copied().unwrap_or(0.0)
    }

    /// The constant `bᵀb`; `energy + offset = ‖Ax − b‖²` for valid assignments.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn labels(&self) -> Option<Vec<QubitLabel>> {
        self.provenance.as_ref().map(|p| p.encoding.labels())
    }

    /// `Σ_{i≤j} Q_ij a_i a_j`.
    pub fn energy(&self, a: &Assignment) -> Result<f64> {
        if a.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                found: a.len(),
            });
        }
        Ok(self.energy_bits(a.bits()))
    }

    pub(crate) fn energy_bits(&self, bits: &[u8]) -> f64 {
        self.coeffs
            .iter()
            .filter(|(&(i, j), _)| bits[i] & bits[j] == 1)
            .map(|(_, c)| c)
            .sum()
    }

    /// Number of stored coefficients above the zero-drop threshold.
    pub fn nonzero_count(&self) -> usize {
        self.coeffs.values().filter(|c| c.abs() > ZERO_DROP).count()
    }

    /// Off-diagonal pairs with a coefficient above the zero-drop threshold.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.coeffs
            .iter()
            .filter(|(&(i, j), c)| i != j && c.abs() > ZERO_DROP)
            .map(|(&k, _)| k)
            .collect()
    }

    pub fn coupling_graph(&self) -> CouplingGraph {
        CouplingGraph {
            nodes: (0..self.n_qubits).collect(),
            labels: self.labels(),
            edges: self.edges(),
        }
    }

    /// Connected components of the coupling graph, each sorted, ordered by
    /// their lowest qubit. Uncoupled qubits are singleton components.
    pub fn block_decomposition(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::<usize>::new(self.n_qubits);
        for (i, j) in self.edges() {
            uf.union(i, j);
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for q in 0..self.n_qubits {
            by_root.entry(uf.find(q)).or_default().push(q);
        }
        let mut blocks: Vec<Vec<usize>> = by_root.into_values().collect();
        blocks.sort_by_key(|b| b[0]);
        blocks
    }

    /// Multiply-adds spent computing the linear coefficients.
    pub fn build_cost(&self) -> Result<u64> {
        self.build_cost.ok_or(Error::InstrumentationDisabled)
    }

    /// Decodes an assignment to `y` and `x = Ry` (`x = y` for vanilla models).
    pub fn decode(&self, a: &Assignment) -> Result<Decoded> {
        let p = self.provenance.as_ref().ok_or_else(|| {
            Error::InvalidParams("model carries no encoding to decode with".into())
        })?;
        let y = decode(&p.encoding, a)?;
        let x = match &p.formulation {
            Formulation::Vanilla => y.clone(),
            Formulation::Sylvester(pair) => pair.r.mul_vec(&y)?,
        };
        Ok(Decoded { y, x })
    }
}

/// Upper bound on stored entries of a vanilla signed-pair model with `m`
/// digits per sign: the full triangle over `2mn` qubits.
pub fn vanilla_nonzero_bound(n: usize, m: usize) -> usize {
    m * n * (2 * m * n + 1)
}

/// Upper bound on stored entries of a Sylvester signed-pair model: `2n`
/// triangles over `m` qubits each.
pub fn sylvester_nonzero_bound(n: usize, m: usize) -> usize {
    m * n * (m + 1)
}

/// The window `[1/(2n), 1/(2n−1)]` for the Sylvester/vanilla entry ratio.
pub fn ratio_window(n: usize) -> (f64, f64) {
    let n = n as f64;
    (1.0 / (2.0 * n), 1.0 / (2.0 * n - 1.0))
}

/// Bound `4·m·n²` on the linear-coefficient cost with `m` digits per sign.
pub fn build_cost_bound(n: usize, m: usize) -> u64 {
    4 * (m as u64) * (n as u64) * (n as u64)
}

struct Builder {
    n_qubits: usize,
    keep_zeros: bool,
    coeffs: BTreeMap<(usize, usize), f64>,
}

impl Builder {
    fn new(n_qubits: usize, opts: &BuildOptions) -> Self {
        let mut coeffs = BTreeMap::new();
        if opts.keep_zeros {
            for i in 0..n_qubits {
                for j in i..n_qubits {
                    coeffs.insert((i, j), 0.0);
                }
            }
        }
        Builder {
            n_qubits,
            keep_zeros: opts.keep_zeros,
            coeffs,
        }
    }

    fn put(&mut self, i: usize, j: usize, c: &BigRational) -> Result<()> {
        let v = to_f64(c);
        if !v.is_finite() {
            return Err(Error::NonFinite("QUBO coefficient"));
        }
        if v.abs() > ZERO_DROP {
            self.coeffs.insert((i, j), v);
        } else if self.keep_zeros {
            self.coeffs.insert((i, j), 0.0);
        }
        Ok(())
    }

    fn finish(self, sys: &LinearSystem, provenance: Provenance, cost: Option<u64>) -> QuboModel {
        QuboModel {
            n_qubits: self.n_qubits,
            coeffs: self.coeffs,
            offset: sys.btb(),
            provenance: Some(provenance),
            build_cost: cost,
        }
    }
}

fn check_vars(sys: &LinearSystem, spec: &EncodingSpec) -> Result<()> {
    if spec.n_vars != sys.n() {
        return Err(Error::Dimension(format!(
            "encoding has {} variables, system has {} unknowns",
            spec.n_vars,
            sys.n()
        )));
    }
    Ok(())
}

/// Per-qubit variable index, exact weight and role.
fn layout(spec: &EncodingSpec) -> Vec<(usize, BigRational, QubitRole)> {
    spec.labels()
        .into_iter()
        .map(|l| (l.var, role_weight(spec, l.role), l.role))
        .collect()
}

pub fn build_vanilla(sys: &LinearSystem, spec: &EncodingSpec) -> Result<QuboModel> {
    build_vanilla_with(sys, spec, &BuildOptions::default())
}

/// Expands `xᵀAᵀAx − 2bᵀAx` over the encoded qubits, reducing `q² = q`.
/// All cross terms are kept, including those between the positive and
/// negative digits of the same variable.
pub fn build_vanilla_with(
    sys: &LinearSystem,
    spec: &EncodingSpec,
    opts: &BuildOptions,
) -> Result<QuboModel> {
    check_vars(sys, spec)?;
    let mut cost = 0u64;
    let g = sys.gram_exact();
    let h = sys.bta(&mut cost);
    let qubits = layout(spec);
    let two = BigRational::from_integer(2.into());
    let mut out = Builder::new(qubits.len(), opts);
    for (a, (va, wa, _)) in qubits.iter().enumerate() {
        cost += 1;
        let lin = &two * &h[*va] * wa;
        out.put(a, a, &(&g[*va][*va] * wa * wa - lin))?;
        for (b, (vb, wb, _)) in qubits.iter().enumerate().skip(a + 1) {
            out.put(a, b, &(&two * &g[*va][*vb] * wa * wb))?;
        }
    }
    let provenance = Provenance {
        formulation: Formulation::Vanilla,
        encoding: *spec,
    };
    Ok(out.finish(sys, provenance, opts.instrument.then_some(cost)))
}

pub fn build_sylvester(
    sys: &LinearSystem,
    pair: &CongruencePair,
    spec: &EncodingSpec,
) -> Result<QuboModel> {
    build_sylvester_with(sys, pair, spec, &BuildOptions::default())
}

/// Expands `yᵀDy − 2bᵀARy`. Signed-pair products of a positive and a
/// negative digit of the same variable are dropped, since a valid
/// assignment never sets both.
pub fn build_sylvester_with(
    sys: &LinearSystem,
    pair: &CongruencePair,
    spec: &EncodingSpec,
    opts: &BuildOptions,
) -> Result<QuboModel> {
    let d = pair.d.iter().copied().map(rational).collect::<Result<Vec<_>>>()?;
    let r = pair
        .r
        .to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(rational).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    sylvester_exact(sys, &d, &r, pair.clone(), spec, opts)
}

/// Like [`build_sylvester_with`] for a pair given in exact rationals. The
/// model's provenance records the pair rounded to `f64`.
pub fn build_sylvester_exact(
    sys: &LinearSystem,
    d: &[BigRational],
    r: &[Vec<BigRational>],
    spec: &EncodingSpec,
    opts: &BuildOptions,
) -> Result<QuboModel> {
    let n = d.len();
    if r.len() != n || r.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension(format!("R must be {n}x{n}")));
    }
    let pair = CongruencePair::new(
        d.iter().map(to_f64).collect(),
        Matrix::from_fn(n, n, |i, j| to_f64(&r[i][j])),
    )?;
    sylvester_exact(sys, d, r, pair, spec, opts)
}

/// `max |RᵀGR − diag(d)|`, exact.
fn exact_pair_residual(g: &[Vec<BigRational>], d: &[BigRational], r: &[Vec<BigRational>]) -> BigRational {
    let n = d.len();
    let gr: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigRational::zero(), |acc, k| acc + &g[i][k] * &r[k][j]))
                .collect()
        })
        .collect();
    let mut worst = BigRational::zero();
    for i in 0..n {
        for j in 0..n {
            let mut v = (0..n).fold(BigRational::zero(), |acc, k| acc + &r[k][i] * &gr[k][j]);
            if i == j {
                v -= &d[i];
            }
            let v = v.abs();
            if v > worst {
                worst = v;
            }
        }
    }
    worst
}

fn sylvester_exact(
    sys: &LinearSystem,
    d: &[BigRational],
    r: &[Vec<BigRational>],
    pair: CongruencePair,
    spec: &EncodingSpec,
    opts: &BuildOptions,
) -> Result<QuboModel> {
    check_vars(sys, spec)?;
    if d.len() != sys.n() {
        return Err(Error::Dimension(format!(
            "pair has dimension {}, system has {} unknowns",
            d.len(),
            sys.n()
        )));
    }
    let g = sys.gram_exact();
    let scale = 1.0 + g.iter().flatten().map(|x| to_f64(x).abs()).fold(0.0, f64::max);
    let residual = to_f64(&exact_pair_residual(&g, d, r));
    let limit = PAIR_RESIDUAL_RTOL * scale;
    if !(residual <= limit) {
        return Err(Error::CongruenceResidual { residual, limit });
    }

    let n = sys.n();
    let mut cost = 0u64;
    let h = sys.bta(&mut cost);
    let c: Vec<BigRational> = (0..n)
        .map(|i| {
            (0..n).fold(BigRational::zero(), |acc, j| {
                cost += 1;
                acc + &h[j] * &r[j][i]
            })
        })
        .collect();

    let qubits = layout(spec);
    let two = BigRational::from_integer(2.into());
    let mut out = Builder::new(qubits.len(), opts);
    for v in 0..n {
        let range = spec.var_range(v);
        for a in range.clone() {
            let (_, wa, ra) = &qubits[a];
            cost += 1;
            let lin = &two * &c[v] * wa;
            out.put(a, a, &(&d[v] * wa * wa - lin))?;
            for b in a + 1..range.end {
                let (_, wb, rb) = &qubits[b];
                let opposite = matches!(
                    (ra, rb),
                    (QubitRole::PosDigit(_), QubitRole::NegDigit(_))
                        | (QubitRole::NegDigit(_), QubitRole::PosDigit(_))
                );
                if spec.kind == EncodingKind::SignedPair && opposite {
                    continue;
                }
                out.put(a, b, &(&two * &d[v] * wa * wb))?;
            }
        }
    }
    let provenance = Provenance {
        formulation: Formulation::Sylvester(pair),
        encoding: *spec,
    };
    Ok(out.finish(sys, provenance, opts.instrument.then_some(cost)))
}
